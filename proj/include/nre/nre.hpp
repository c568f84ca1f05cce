#pragma once

#include "nre/census.hpp"
#include "nre/chains.hpp"
#include "nre/constructions.hpp"
#include "nre/cycle.hpp"
#include "nre/digest.hpp"
#include "nre/equation.hpp"
#include "nre/error.hpp"
#include "nre/number_theory.hpp"
#include "nre/verify.hpp"
