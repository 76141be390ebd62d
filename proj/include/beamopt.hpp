#pragma once

// Umbrella header for the beamopt toolkit.

#include "beamopt/adaptive.hpp"
#include "beamopt/bench.hpp"
#include "beamopt/cli.hpp"
#include "beamopt/conic.hpp"
#include "beamopt/hybrid.hpp"
#include "beamopt/io.hpp"
#include "beamopt/irs.hpp"
#include "beamopt/linalg.hpp"
#include "beamopt/manifold.hpp"
#include "beamopt/model.hpp"
#include "beamopt/multicast.hpp"
#include "beamopt/procrustes.hpp"
#include "beamopt/rng.hpp"
#include "beamopt/rootfind.hpp"
