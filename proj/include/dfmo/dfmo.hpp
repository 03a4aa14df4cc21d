// Umbrella header.
#ifndef DFMO_DFMO_HPP
#define DFMO_DFMO_HPP

#include "algorithms.hpp"
#include "criticality.hpp"
#include "directions.hpp"
#include "evaluator.hpp"
#include "hypervolume.hpp"
#include "io.hpp"
#include "linesearch.hpp"
#include "pareto.hpp"
#include "problems.hpp"
#include "protocol.hpp"
#include "types.hpp"

#endif  // DFMO_DFMO_HPP
