#pragma once

// Umbrella header: the full solver/reduction toolchain.

#include "pbrom/array3.hpp"
#include "pbrom/boundary.hpp"
#include "pbrom/bspline.hpp"
#include "pbrom/coefficient_maps.hpp"
#include "pbrom/config.hpp"
#include "pbrom/constants.hpp"
#include "pbrom/deim.hpp"
#include "pbrom/driver.hpp"
#include "pbrom/energy.hpp"
#include "pbrom/errors.hpp"
#include "pbrom/grid.hpp"
#include "pbrom/io.hpp"
#include "pbrom/molecule.hpp"
#include "pbrom/operator.hpp"
#include "pbrom/pcg.hpp"
#include "pbrom/rom.hpp"
#include "pbrom/slice.hpp"
#include "pbrom/surface.hpp"
#include "pbrom/timing.hpp"
