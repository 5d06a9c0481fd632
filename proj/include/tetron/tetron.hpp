#pragma once

#include "tetron/analytic.hpp"
#include "tetron/bdg.hpp"
#include "tetron/codes.hpp"
#include "tetron/common.hpp"
#include "tetron/gaussian.hpp"
#include "tetron/noise.hpp"
#include "tetron/oracle.hpp"
#include "tetron/pfaffian.hpp"
#include "tetron/sweep.hpp"
#include "tetron/validation.hpp"
#include "tetron/wannier.hpp"
