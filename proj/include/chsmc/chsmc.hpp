#pragma once

#include "chsmc/config.hpp"
#include "chsmc/diagnostics.hpp"
#include "chsmc/errors.hpp"
#include "chsmc/experiments.hpp"
#include "chsmc/field.hpp"
#include "chsmc/graphs.hpp"
#include "chsmc/selftest.hpp"
#include "chsmc/smc.hpp"
#include "chsmc/snapshot.hpp"
#include "chsmc/stepper.hpp"
