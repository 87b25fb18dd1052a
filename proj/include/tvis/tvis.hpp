#pragma once

// Umbrella header.

#include "tvis/calculus.hpp"
#include "tvis/checks.hpp"
#include "tvis/degrade.hpp"
#include "tvis/grid.hpp"
#include "tvis/manifest.hpp"
#include "tvis/mld.hpp"
#include "tvis/pgm.hpp"
#include "tvis/shrinkage.hpp"
#include "tvis/spectral.hpp"
#include "tvis/tv.hpp"
