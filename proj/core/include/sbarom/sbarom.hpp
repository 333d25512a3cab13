#pragma once

#include "sbarom/dynamics.hpp"
#include "sbarom/error.hpp"
#include "sbarom/identification.hpp"
#include "sbarom/integrator.hpp"
#include "sbarom/io.hpp"
#include "sbarom/kinematics.hpp"
#include "sbarom/reconstruction.hpp"
#include "sbarom/spline.hpp"
