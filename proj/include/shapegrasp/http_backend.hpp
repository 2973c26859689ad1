#pragma once

// OpenAI-compatible chat-completions backend. Wire format:
//   POST {base}/chat/completions
//   {"model": ..., "messages": [{"role","content"}...], "temperature": 0}
// with the reply parsed from choices[0].message.content. Base URL, key, and
// model come from SHAPEGRASP_API_BASE / SHAPEGRASP_API_KEY / SHAPEGRASP_MODEL
// unless set explicitly.

#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "shapegrasp/errors.hpp"
#include "shapegrasp/reasoner.hpp"

namespace shapegrasp {

class HttpChatBackend : public ChatBackend {
public:
  HttpChatBackend(std::string base_url, std::string api_key, std::string model,
                  double temperature = 0.0)
      : api_key_(std::move(api_key)), model_(std::move(model)), temperature_(temperature) {
    if (base_url.empty()) throw ConfigError("http backend: base URL is empty");
    while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();

    // Split scheme://host[:port] from the path prefix.
    std::size_t scheme_end = base_url.find("://");
    std::size_t path_start =
        base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) {
      host_ = base_url;
    } else {
      host_ = base_url.substr(0, path_start);
      path_prefix_ = base_url.substr(path_start);
    }
  }

  std::string complete(const std::vector<ChatMessage>& messages) override {
    nlohmann::json body;
    body["model"] = model_;
    body["temperature"] = temperature_;
    body["messages"] = nlohmann::json::array();
    for (const ChatMessage& m : messages)
      body["messages"].push_back({{"role", m.role}, {"content", m.content}});

    httplib::Client client(host_);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(),
                           "application/json");
    if (!res) throw BackendUnavailable("chat completion request failed: " + host_);
    if (res->status < 200 || res->status >= 300)
      throw BackendUnavailable("chat completion HTTP " + std::to_string(res->status) + ": " +
                               res->body.substr(0, 500));

    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw BackendUnavailable("chat completion returned invalid JSON");
    try {
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw BackendUnavailable("chat completion response missing choices[0].message.content");
    }
  }

  std::string name() const override { return "http:" + model_; }

private:
  std::string host_;
  std::string path_prefix_;
  std::string api_key_;
  std::string model_;
  double temperature_;
};

inline std::unique_ptr<HttpChatBackend> make_http_backend_from_env(double temperature = 0.0) {
  const char* base = std::getenv("SHAPEGRASP_API_BASE");
  const char* key = std::getenv("SHAPEGRASP_API_KEY");
  const char* model = std::getenv("SHAPEGRASP_MODEL");
  if (!base || !*base) throw ConfigError("SHAPEGRASP_API_BASE is not set");
  return std::make_unique<HttpChatBackend>(base, key ? key : "", model && *model ? model : "gpt-4",
                                           temperature);
}

}  // namespace shapegrasp
