// Copyright 2026 The phq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phq {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
   public:
    using Error::Error;
};

class InvalidTopologyError : public Error {
   public:
    using Error::Error;
};

class UnsupportedConfigurationError : public Error {
   public:
    using Error::Error;
};

/// Fidelity or scale factor requested for a zero-norm vector.
class UndefinedMetricError : public Error {
   public:
    using Error::Error;
};

/// Exhaustive enumeration requested beyond the supported dimension.
class BudgetError : public Error {
   public:
    using Error::Error;
};

/// Success curves are meaningless when the optimum cost is zero.
class DegenerateProblemError : public Error {
   public:
    using Error::Error;
};

class ConfigError : public Error {
   public:
    using Error::Error;
};

class IoError : public Error {
   public:
    using Error::Error;
};

/// The weight matrix has an eigenvalue below the accepted tolerance.
class NotPsdError : public Error {
   public:
    explicit NotPsdError(double eigenvalue)
        : Error("weight matrix is not positive semi-definite: eigenvalue " + std::to_string(eigenvalue)),
          eigenvalue_(eigenvalue) {}

    double eigenvalue() const noexcept { return eigenvalue_; }

   private:
    double eigenvalue_;
};

/// An evaluator failed inside an annealing run.
class EvaluationError : public Error {
   public:
    EvaluationError(std::size_t iteration, const std::string& what)
        : Error("evaluation failed at iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

   private:
    std::size_t iteration_;
};

}  // namespace phq
