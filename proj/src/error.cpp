/* Copyright 2026 The viewx Authors. All Rights Reserved.

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

#include "viewx/error.hpp"

namespace viewx {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfRangeIndex: return "OutOfRangeIndex";
    case ErrorKind::SelfLoopEdge: return "SelfLoopEdge";
    case ErrorKind::OverlappingSplits: return "OverlappingSplits";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::TooFewViews: return "TooFewViews";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::StaleCache: return "StaleCache";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::TooFewChannels: return "TooFewChannels";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::MTooLarge: return "MTooLarge";
    case ErrorKind::SpecMismatch: return "SpecMismatch";
    case ErrorKind::InsufficientLabeledNodes: return "InsufficientLabeledNodes";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UsageError: return "UsageError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace viewx
