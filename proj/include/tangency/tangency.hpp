#pragma once

#include "tangency/errors.hpp"
#include "tangency/map_core.hpp"
#include "tangency/asymptotics.hpp"
#include "tangency/orbit.hpp"
#include "tangency/bifurcation.hpp"
#include "tangency/portrait.hpp"
