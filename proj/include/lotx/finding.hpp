// Copyright 2026 The lotx Authors
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

namespace lotx {

/// Outcome of a single necessary-condition check.
enum class Finding { pass, impossible, inconclusive };

/// The verdict lattice.
enum class Status { impossible, certified, inconclusive };

inline const char* to_string(Finding f) {
  switch (f) {
    case Finding::pass:
      return "pass";
    case Finding::impossible:
      return "impossible";
    case Finding::inconclusive:
      return "inconclusive";
  }
  return "?";
}

inline const char* to_string(Status s) {
  switch (s) {
    case Status::impossible:
      return "Impossible";
    case Status::certified:
      return "Certified";
    case Status::inconclusive:
      return "Inconclusive";
  }
  return "?";
}

}  // namespace lotx
