#ifndef BSIM_TYPES_HPP
#define BSIM_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace bsim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Every chain owns one of these; all stochastic code takes it by reference.
using Rng = std::mt19937_64;

}  // namespace bsim

#endif  // BSIM_TYPES_HPP
