// Umbrella header.
#pragma once

#include "hypar/error.hpp"
#include "hypar/geometry.hpp"
#include "hypar/nonlocal.hpp"
#include "hypar/hyperbolic.hpp"
#include "hypar/parabolic.hpp"
#include "hypar/bounds.hpp"
#include "hypar/coupling.hpp"
#include "hypar/verify.hpp"
#include "hypar/presets.hpp"
#include "hypar/config.hpp"
#include "hypar/output.hpp"
