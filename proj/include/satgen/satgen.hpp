#pragma once

#include "satgen/cluster.hpp"
#include "satgen/error.hpp"
#include "satgen/generator.hpp"
#include "satgen/hap_io.hpp"
#include "satgen/hapdata.hpp"
#include "satgen/markov.hpp"
#include "satgen/metrics.hpp"
#include "satgen/parallel.hpp"
#include "satgen/privacy.hpp"
#include "satgen/reverse.hpp"
#include "satgen/rng.hpp"
#include "satgen/sat.hpp"
#include "satgen/sat_solver.hpp"
