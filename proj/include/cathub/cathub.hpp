#pragma once

#include "cathub/error.hpp"
#include "cathub/log_real.hpp"
#include "cathub/z_function.hpp"
#include "cathub/fock.hpp"
#include "cathub/hub.hpp"
#include "cathub/scs.hpp"
#include "cathub/optimize.hpp"
#include "cathub/probabilities.hpp"
#include "cathub/detector.hpp"
#include "cathub/oracle.hpp"
#include "cathub/sweeps.hpp"
