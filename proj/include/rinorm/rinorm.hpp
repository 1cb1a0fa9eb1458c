#pragma once

#include "rinorm/measure_space.hpp"
#include "rinorm/rearrangement.hpp"
#include "rinorm/young_function.hpp"
#include "rinorm/ri_norms.hpp"
#include "rinorm/gain.hpp"
#include "rinorm/poincare.hpp"
#include "rinorm/certificate.hpp"
#include "rinorm/registry.hpp"
