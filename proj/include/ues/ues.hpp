#pragma once

// Umbrella header.

#include "ues/config.hpp"
#include "ues/costs.hpp"
#include "ues/csv.hpp"
#include "ues/dynamics.hpp"
#include "ues/eig.hpp"
#include "ues/graph.hpp"
#include "ues/growth.hpp"
#include "ues/integrate.hpp"
#include "ues/lmi.hpp"
#include "ues/metrics.hpp"
#include "ues/scenario.hpp"
#include "ues/svg.hpp"
