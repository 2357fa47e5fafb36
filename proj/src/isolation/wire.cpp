#include "seqbench/isolation/wire.hpp"

#include <array>
#include <cstring>

#include "seqbench/core/error.hpp"

namespace seqbench::isolation {

namespace {

constexpr std::array<std::pair<MessageType, std::string_view>, 8> kNames{{
    {MessageType::Hello, "hello"},
    {MessageType::Ack, "ack"},
    {MessageType::Info, "info"},
    {MessageType::Evaluate, "evaluate"},
    {MessageType::Result, "result"},
    {MessageType::Log, "log"},
    {MessageType::Error, "error"},
    {MessageType::Shutdown, "shutdown"},
}};

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ProtocolError, what); }

void require_string(const nlohmann::json& p, const char* key, std::string_view type) {
  if (!p.contains(key) || !p.at(key).is_string()) {
    bad(std::string(type) + " needs a string '" + key + "'");
  }
}

}  // namespace

std::string_view to_string(MessageType type) noexcept {
  for (const auto& [t, name] : kNames) {
    if (t == type) return name;
  }
  return "unknown";
}

std::optional<MessageType> message_type_from_string(std::string_view name) noexcept {
  for (const auto& [t, n] : kNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

void validate_payload(const WireMessage& msg) {
  const auto& p = msg.payload;
  const auto type = to_string(msg.type);
  if (!p.is_object()) bad(std::string(type) + " payload must be an object");
  if (p.contains("type")) bad("payload may not carry its own 'type'");
  switch (msg.type) {
    case MessageType::Hello:
      require_string(p, "version", type);
      break;
    case MessageType::Ack:
    case MessageType::Shutdown:
      break;
    case MessageType::Info:
      if (p.contains("problem") && !p.at("problem").is_object()) bad("info 'problem' must be an object");
      break;
    case MessageType::Evaluate: {
      if (!p.contains("sequences") || !p.at("sequences").is_array()) bad("evaluate needs 'sequences'");
      for (const auto& seq : p.at("sequences")) {
        if (!seq.is_array()) bad("each sequence must be a list of tokens");
        for (const auto& tok : seq) {
          if (!tok.is_string()) bad("tokens must be strings");
        }
      }
      break;
    }
    case MessageType::Result: {
      if (!p.contains("scores") || !p.at("scores").is_array()) bad("result needs 'scores'");
      for (const auto& s : p.at("scores")) {
        if (!s.is_number()) bad("scores must be numbers");
      }
      break;
    }
    case MessageType::Log:
      if (!p.contains("message") || !p.at("message").is_object()) bad("log needs an object 'message'");
      break;
    case MessageType::Error:
      require_string(p, "code", type);
      require_string(p, "message", type);
      break;
  }
}

std::string encode_message(const WireMessage& msg) {
  validate_payload(msg);
  nlohmann::json doc = msg.payload;
  doc["type"] = std::string(to_string(msg.type));
  const std::string body = doc.dump();
  if (body.size() > kMaxPayloadBytes) {
    throw Error(ErrorCode::PayloadTooLarge,
                std::to_string(body.size()) + " bytes exceeds the frame limit of " +
                    std::to_string(kMaxPayloadBytes));
  }
  const auto n = static_cast<std::uint32_t>(body.size());
  std::string frame(4, '\0');
  frame[0] = static_cast<char>((n >> 24) & 0xFF);
  frame[1] = static_cast<char>((n >> 16) & 0xFF);
  frame[2] = static_cast<char>((n >> 8) & 0xFF);
  frame[3] = static_cast<char>(n & 0xFF);
  frame += body;
  return frame;
}

WireMessage parse_payload(std::string_view payload) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(payload.begin(), payload.end());
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("payload is not JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("payload is not a JSON object");
  const auto it = doc.find("type");
  if (it == doc.end() || !it->is_string()) bad("payload has no string 'type'");
  const auto name = it->get<std::string>();
  const auto type = message_type_from_string(name);
  if (!type) bad("unknown message type '" + name + "'");
  doc.erase("type");
  WireMessage msg{*type, std::move(doc)};
  validate_payload(msg);
  return msg;
}

WireMessage read_message(const ReadFn& read) {
  auto read_exact = [&](char* dst, std::size_t n, const char* what) {
    std::size_t got = 0;
    while (got < n) {
      const std::size_t k = read(dst + got, n - got);
      if (k == 0) {
        throw Error(ErrorCode::ConnectionClosed, std::string("stream ended inside the ") + what + " (" +
                                                     std::to_string(got) + " of " + std::to_string(n) +
                                                     " bytes)");
      }
      got += k;
    }
  };
  unsigned char prefix[4];
  read_exact(reinterpret_cast<char*>(prefix), 4, "length prefix");
  const std::size_t n = (std::size_t{prefix[0]} << 24) | (std::size_t{prefix[1]} << 16) |
                        (std::size_t{prefix[2]} << 8) | std::size_t{prefix[3]};
  if (n > kMaxPayloadBytes) bad("declared payload of " + std::to_string(n) + " bytes exceeds the limit");
  std::string payload(n, '\0');
  read_exact(payload.data(), n, "payload");
  return parse_payload(payload);
}

WireMessage decode_message(std::string_view bytes, std::size_t* consumed) {
  std::size_t pos = 0;
  const ReadFn read = [&](char* dst, std::size_t n) {
    const std::size_t k = std::min(n, bytes.size() - pos);
    std::memcpy(dst, bytes.data() + pos, k);
    pos += k;
    return k;
  };
  WireMessage msg = read_message(read);
  if (consumed != nullptr) *consumed = pos;
  return msg;
}

WireMessage make_error(std::string code, std::string message) {
  return {MessageType::Error, {{"code", std::move(code)}, {"message", std::move(message)}}};
}

}  // namespace seqbench::isolation
