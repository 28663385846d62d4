#pragma once

// Umbrella header for the spinsurf toolkit: spinorial characterization of
// isometric immersions of signature-(p,q) surfaces into 3-dimensional
// pseudo-Riemannian space forms, verified numerically on coordinate charts.

#include "spinsurf/ambient.hpp"
#include "spinsurf/chart.hpp"
#include "spinsurf/clifford.hpp"
#include "spinsurf/core.hpp"
#include "spinsurf/linalg.hpp"
#include "spinsurf/reconstruct.hpp"
#include "spinsurf/report.hpp"
#include "spinsurf/transport.hpp"
