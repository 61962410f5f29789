/*
   Copyright 2026 The Xscope Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xscope {

enum class Errc {
    kMalformedAddress,
    kMalformedHash,
    kMalformedAmount,
    kInvalidState,
    kMissingRouterConfig,
    kTraceMismatch,
    kDuplicateEvent,
    kConfigParse,
    kConfigInvalid,
    kIo,
    kRecordParse,
    kSpecParse,
    kUnknownVariant,
    kIncompleteSequence,
    kBadFlag,
};

inline std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::kMalformedAddress: return "MalformedAddress";
        case Errc::kMalformedHash: return "MalformedHash";
        case Errc::kMalformedAmount: return "MalformedAmount";
        case Errc::kInvalidState: return "InvalidState";
        case Errc::kMissingRouterConfig: return "MissingRouterConfig";
        case Errc::kTraceMismatch: return "TraceMismatch";
        case Errc::kDuplicateEvent: return "DuplicateEvent";
        case Errc::kConfigParse: return "ConfigParse";
        case Errc::kConfigInvalid: return "ConfigInvalid";
        case Errc::kIo: return "Io";
        case Errc::kRecordParse: return "RecordParse";
        case Errc::kSpecParse: return "SpecParse";
        case Errc::kUnknownVariant: return "UnknownVariant";
        case Errc::kIncompleteSequence: return "IncompleteSequence";
        case Errc::kBadFlag: return "BadFlag";
    }
    return "Unknown";
}

/// Library-wide error type. The code tells callers what failed; the message
/// carries the offending value or file/line context.
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void throw_error(Errc code, const std::string& message) {
    throw Error{code, message};
}

}  // namespace xscope
