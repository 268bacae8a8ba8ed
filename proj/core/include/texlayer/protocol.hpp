#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "texlayer/project.hpp"

namespace texlayer {

/// One protocol message. Text frames carry the JSON envelope
/// {"kind", "id", "body"}; binary frames are a u32 little-endian envelope
/// length, the envelope (with "payload_size") and the payload bytes.
struct WireMessage {
  std::string kind;
  nlohmann::json id;  // echoed verbatim in the reply
  nlohmann::json body = nlohmann::json::object();
  std::string payload;

  bool operator==(const WireMessage&) const = default;
};

std::string encode_text_frame(const WireMessage& message);
std::string encode_binary_frame(const WireMessage& message);
/// Throws BadRequest on malformed frames.
WireMessage decode_frame(std::string_view frame, bool binary);

/// Error reply: kind "error", body {"code", "message", "request"}.
WireMessage error_reply(const nlohmann::json& id, ErrorCode code, const std::string& message,
                        std::string_view request_kind = {});

/// Maps requests onto project operations. handle() never throws; failures
/// become error replies with the stable code names of ErrorCode.
class Dispatcher {
 public:
  explicit Dispatcher(Project& project, std::filesystem::path project_dir = {});

  WireMessage handle(const WireMessage& request);
  /// Decodes and handles one raw frame; malformed frames yield bad_request.
  WireMessage handle_frame(std::string_view frame, bool binary);

  /// Request kinds in registration order; replies are "<kind>_result"
  /// except ping, which answers "pong".
  std::vector<std::string> request_kinds() const;

  Project& project() { return project_; }

 private:
  using Handler = std::function<void(const WireMessage&, WireMessage&)>;
  void add(std::string kind, Handler handler);

  Project& project_;
  std::filesystem::path project_dir_;
  std::vector<std::string> order_;
  std::map<std::string, Handler, std::less<>> handlers_;
};

}  // namespace texlayer
