#pragma once

#include "igr/errors.hpp"
#include "igr/grid.hpp"
#include "igr/elliptic.hpp"
#include "igr/physics.hpp"
#include "igr/schemes.hpp"
#include "igr/reference.hpp"
#include "igr/geodesic.hpp"
#include "igr/output.hpp"
#include "igr/presets.hpp"
#include "igr/config.hpp"
#include "igr/experiments.hpp"
#include "igr/acceptance.hpp"
