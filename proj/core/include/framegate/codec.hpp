#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "framegate/messages.hpp"

namespace framegate {

/// Upper bound on a frame payload; longer length prefixes are Malformed.
inline constexpr std::uint32_t max_frame_payload = 1u << 24;

/// Canonical text payload (see docs/wire.md). Deterministic: fixed field
/// order, shortest round-trip decimal for every double.
std::string encode(const WireMessage& msg);

/// Inverse of encode. Malformed with byte offset and the expected token;
/// VersionMismatch for a Hello from another protocol version.
WireMessage decode(std::string_view payload);

/// 4-byte little-endian length followed by the payload.
std::string frame(std::string_view payload);

/// Splits one frame off the front of `buffer`. nullopt when more bytes are
/// needed; Malformed when the length prefix exceeds max_frame_payload.
std::optional<std::string> unframe(std::string_view buffer, std::size_t& consumed);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace framegate
