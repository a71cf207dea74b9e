#pragma once

#include <stdexcept>
#include <string>

namespace geomvqe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file, unsupported element, invalid molecule.
class InputError : public Error {
 public:
  using Error::Error;
};

class ScfConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Molecular orbitals at a displaced geometry could not be matched to the reference set.
class OrbitalMatchError : public Error {
 public:
  using Error::Error;
};

/// A numerical invariant that should hold by construction was violated.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace geomvqe
