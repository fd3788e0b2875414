#pragma once

// JSON forms of the library types. Doubles are written with 17 significant
// digits so every value round-trips bit for bit.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gsis/autocorr.hpp"
#include "gsis/equiv.hpp"
#include "gsis/recover.hpp"
#include "gsis/signal.hpp"

namespace gsis::io {

using Json = nlohmann::ordered_json;

// Compact-indented text; non-finite doubles are written as null.
std::string dump(const Json& j);
// Throws Error(Parse).
Json parse(std::string_view text);

std::string read_file(const std::filesystem::path& path);   // throws Error(Io)
void write_file(const std::filesystem::path& path, std::string_view text);

Json to_json(const GaussianSignal& s);
Json to_json(const SampleSet& s);
Json to_json(const AutocorrData& d);
Json to_json(const RecoveryResult& r);
Json to_json(const EquivalenceReport& e);

// All throw Error(Parse) on missing or mistyped fields.
GaussianSignal signal_from_json(const Json& j);
SampleSet samples_from_json(const Json& j);
AutocorrData autocorr_from_json(const Json& j);
RecoveryResult recovery_from_json(const Json& j);
EquivalenceReport equivalence_from_json(const Json& j);

}  // namespace gsis::io
