#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace seqbench::isolation {

inline constexpr std::string_view kProtocolVersion = "seqbench/1";
inline constexpr std::size_t kMaxPayloadBytes = std::size_t{64} << 20;

enum class MessageType { Hello, Ack, Info, Evaluate, Result, Log, Error, Shutdown };

std::string_view to_string(MessageType type) noexcept;
std::optional<MessageType> message_type_from_string(std::string_view name) noexcept;

/// Payload fields sit next to "type" in one JSON object, so a message with
/// an empty payload encodes as {"type":"<name>"}.
///
///   hello     {"version"}
///   ack       {"version"} or {}
///   info      {} from the client, {"problem": ProblemInfo} from the server
///   evaluate  {"sequences": [[token, ...], ...]}
///   result    {"scores": [number, ...]}
///   log       {"message": object}
///   error     {"code", "message"}
///   shutdown  {}
struct WireMessage {
  MessageType type = MessageType::Ack;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const WireMessage&) const = default;
};

/// Throws ProtocolError when the payload does not fit the type.
void validate_payload(const WireMessage& msg);

/// 4-byte big-endian payload length followed by the JSON payload.
/// Throws PayloadTooLarge beyond kMaxPayloadBytes.
std::string encode_message(const WireMessage& msg);

/// Parses one payload (no length prefix). Throws ProtocolError.
WireMessage parse_payload(std::string_view payload);

/// Fills up to n bytes of dst; returns the count, 0 meaning end of stream.
using ReadFn = std::function<std::size_t(char* dst, std::size_t n)>;

/// Reads exactly one frame. Throws ConnectionClosed on end of stream before
/// the frame is complete and ProtocolError on malformed content.
WireMessage read_message(const ReadFn& read);

/// Decodes the frame at the start of bytes; `consumed` receives its size.
WireMessage decode_message(std::string_view bytes, std::size_t* consumed = nullptr);

WireMessage make_error(std::string code, std::string message);

}  // namespace seqbench::isolation
