/* Copyright 2026 The RITFIS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace ritfis {

// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Transport failure that survived the retry budget.
class QueryFailed : public Error {
 public:
  using Error::Error;
};

// The model replied, but no verbalizer trigger matched.
class LabelParseFailed : public Error {
 public:
  explicit LabelParseFailed(std::string raw)
      : Error("no label trigger found in response: " + raw),
        raw_(std::move(raw)) {}

  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

// An edit list does not replay onto the text it claims to describe.
class ReplayError : public Error {
 public:
  using Error::Error;
};

class EmptyRegion : public Error {
 public:
  EmptyRegion() : Error("EMPTY_REGION: perturbable region has no word tokens") {}
};

}  // namespace ritfis
