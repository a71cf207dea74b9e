#pragma once

#include "units.hpp"
#include "error.hpp"
#include "molecule.hpp"
#include "basis.hpp"
#include "boys.hpp"
#include "integrals.hpp"
#include "scf.hpp"
#include "pauli.hpp"
#include "fermion.hpp"
#include "statevector.hpp"
#include "hamiltonian.hpp"
#include "optimizer.hpp"
#include "fci.hpp"
#include "vqe.hpp"
#include "io.hpp"
