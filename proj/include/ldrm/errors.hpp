#pragma once

#include <stdexcept>
#include <string>

namespace ldrm {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class OutOfSupport : public Error {
 public:
  explicit OutOfSupport(const std::string& where) : Error("out of support: " + where) {}
};

class DomainExceeded : public Error {
 public:
  explicit DomainExceeded(const std::string& where) : Error("domain exceeded: " + where) {}
};

class NonConvergence : public Error {
 public:
  explicit NonConvergence(const std::string& where) : Error("no convergence: " + where) {}
};

class DegenerateDensity : public Error {
 public:
  explicit DegenerateDensity(const std::string& where) : Error("degenerate density: " + where) {}
};

class InvalidShapeRatio : public Error {
 public:
  explicit InvalidShapeRatio(const std::string& where) : Error("invalid shape ratio: " + where) {}
};

class InsufficientTail : public Error {
 public:
  explicit InsufficientTail(const std::string& where) : Error("insufficient tail: " + where) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& where) : Error("usage: " + where) {}
};

}  // namespace ldrm
