#pragma once

#include <stdexcept>
#include <string>

namespace echosim {

// Invalid parameters or configuration (bad sample rates, unknown keys, infeasible layouts).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Input too short or otherwise mis-shaped for the requested transform.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed external data (WAV containers, manifests, feature dumps).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// API misuse such as stepping a finished episode.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace echosim
