#pragma once

// Umbrella header: the full symbolic-numeric toolkit for mapping
// PT-symmetric Hamiltonians to equivalent hermitian position-dependent-mass
// models, verifying the map, and taking its classical limit.

#include "ptpdm/scalar.hpp"
#include "ptpdm/expr.hpp"
#include "ptpdm/parser.hpp"
#include "ptpdm/normal_op.hpp"
#include "ptpdm/model.hpp"
#include "ptpdm/spectral.hpp"
#include "ptpdm/classical.hpp"
#include "ptpdm/examples.hpp"
