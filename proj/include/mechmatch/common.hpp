#pragma once

// Shared scalar types and error hierarchy for the mechmatch library.
//
// All arithmetic that feeds a comparison is exact: arbitrary-precision
// integers for matching weights, rationals for probabilities and expected
// utilities. Nothing in the library touches floating point.

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace mechmatch {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Base class for everything the library throws.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: bad graph data, unknown vertex/agent ids, invalid
// matchings, unparseable files.
struct InputError : Error {
    explicit InputError(const std::string& msg) : Error(msg) {}
};

// Instance exceeds a configured brute-force bound.
struct SizeError : Error {
    explicit SizeError(const std::string& msg) : Error(msg) {}
};

// Vertex cap for brute-force operations (enumeration, reference mechanisms,
// the strategyproofness verifier). Default 16; the MECHMATCH_ORACLE_BOUND
// environment variable overrides it. Throws InputError if the variable is
// set to something that is not a positive integer.
int oracle_bound();

// splitmix64 step, used to derive independent per-instance seeds from one
// master seed. Public-domain construction (Steele, Lea, Flood).
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace mechmatch
