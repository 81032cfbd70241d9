// Copyright 2026 The netsense Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#pragma once

#include <stdexcept>
#include <string>

namespace netsense {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent configuration: dimension mismatch, invalid schedule,
// unknown config key, out-of-range mask index.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite gradient state.
class GradientError : public Error {
 public:
  using Error::Error;
};

class CorruptPayloadError : public Error {
 public:
  using Error::Error;
};

class MeasurementError : public Error {
 public:
  using Error::Error;
};

// Estimator queried before any measurement was recorded.
class NotReadyError : public Error {
 public:
  using Error::Error;
};

}  // namespace netsense
