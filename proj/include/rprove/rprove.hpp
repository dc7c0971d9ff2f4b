#pragma once

#include "rprove/certificate.hpp"
#include "rprove/desingularize.hpp"
#include "rprove/dynamics.hpp"
#include "rprove/errors.hpp"
#include "rprove/hexfloat.hpp"
#include "rprove/integrator.hpp"
#include "rprove/interval.hpp"
#include "rprove/linalg.hpp"
#include "rprove/methods.hpp"
#include "rprove/planner.hpp"
#include "rprove/taylor.hpp"
