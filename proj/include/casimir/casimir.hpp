#pragma once

#include "casimir/config.hpp"
#include "casimir/constants.hpp"
#include "casimir/kinematics.hpp"
#include "casimir/material.hpp"
#include "casimir/oracle.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/reflection.hpp"
#include "casimir/stack.hpp"
#include "casimir/sweep.hpp"
#include "casimir/te_channel.hpp"
#include "casimir/tm_channel.hpp"
#include "casimir/verify.hpp"
