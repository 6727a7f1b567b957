#pragma once

#include "ecoc_rl/bench.hpp"
#include "ecoc_rl/core.hpp"
#include "ecoc_rl/ecoc.hpp"
#include "ecoc_rl/envs/maze.hpp"
#include "ecoc_rl/envs/mountain_car.hpp"
#include "ecoc_rl/envs/tabular.hpp"
#include "ecoc_rl/error.hpp"
#include "ecoc_rl/learners.hpp"
#include "ecoc_rl/linear.hpp"
#include "ecoc_rl/mdp.hpp"
#include "ecoc_rl/parallel.hpp"
#include "ecoc_rl/policy.hpp"
#include "ecoc_rl/random.hpp"
