#pragma once

namespace seqbench {

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace seqbench
