// SPDX-License-Identifier: Apache-2.0
//
// leoce - channel estimation toolkit for LEO satellite massive MIMO OFDM uplinks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace leoce {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kBoltzmann = 1.38e-23;     // J/K, value used by the link budget
inline constexpr double kSpeedOfLight = 299792458.0; // m/s

// Paired space angle (direction cosines) indexing a UPA steering vector.
struct SpaceAngle {
    double x = 0.0;
    double y = 0.0;

    double radius_sq() const { return x * x + y * y; }
};

// exp(-j 2 pi num / den) with the numerator reduced modulo den in integer
// arithmetic, so large index products keep full phase accuracy.
inline cplx unit_phase(std::int64_t num, std::int64_t den)
{
    std::int64_t r = num % den;
    if (r < 0)
        r += den;
    const double a = -2.0 * kPi * static_cast<double>(r) / static_cast<double>(den);
    return {std::cos(a), std::sin(a)};
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

// ----- errors -------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the admissible domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// UT below the horizon or otherwise inconsistent satellite geometry.
class GeometryError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

// More pilots requested than the delay-domain windows can host.
class CapacityError : public Error {
public:
    using Error::Error;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Levinson breakdown: a reflection coefficient reached unit magnitude.
class NotPositiveDefiniteError : public Error {
public:
    NotPositiveDefiniteError(std::size_t index, double magnitude)
        : Error("Toeplitz matrix is not positive definite: |reflection| = " + std::to_string(magnitude) +
                " at order " + std::to_string(index)),
          index_(index), magnitude_(magnitude)
    {
    }

    std::size_t index() const { return index_; }
    double magnitude() const { return magnitude_; }

private:
    std::size_t index_;
    double magnitude_;
};

} // namespace leoce
