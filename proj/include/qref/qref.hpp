#ifndef QREF_QREF_HPP
#define QREF_QREF_HPP

#include "qref/bath.hpp"
#include "qref/config.hpp"
#include "qref/csv.hpp"
#include "qref/density.hpp"
#include "qref/dynamics.hpp"
#include "qref/errors.hpp"
#include "qref/experiments.hpp"
#include "qref/hamiltonian.hpp"
#include "qref/jump_operators.hpp"
#include "qref/liouvillian.hpp"
#include "qref/mpemba.hpp"
#include "qref/optim.hpp"
#include "qref/parallel.hpp"
#include "qref/params.hpp"
#include "qref/spectral.hpp"
#include "qref/types.hpp"

#endif
