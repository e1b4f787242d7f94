#pragma once

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "mlar/domain.hpp"

namespace testing {

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() /
            ("mlar_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path templates_dir() {
  if (const char* env = std::getenv("MLAR_TEMPLATES_DIR")) return env;
  return "templates";
}

// Local HTTP stub standing in for a model endpoint. The handler receives the
// 1-based request number and the prompt and returns (status, body).
class StubLlm {
 public:
  using Handler = std::function<std::pair<int, std::string>(
      int request_number, const std::string& prompt)>;

  explicit StubLlm(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/generate", [this](const httplib::Request& req,
                                     httplib::Response& res) {
      int n = ++requests_;
      std::string prompt;
      try {
        prompt = mlar::Json::parse(req.body).value("prompt", "");
      } catch (...) {
      }
      if (req.has_header("Authorization")) {
        last_auth_ = req.get_header_value("Authorization");
      }
      auto [status, body] = handler_(n, prompt);
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubLlm() {
    server_.stop();
    thread_.join();
  }

  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/generate";
  }
  int requests() const { return requests_.load(); }
  std::string last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  Handler handler_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::string last_auth_;
};

// Accepts SMTP sessions and records each submitted message payload.
class StubSmtp {
 public:
  StubSmtp() {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    int yes = 1;
    setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
    socklen_t len = sizeof(addr);
    getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    listen(fd_, 8);
    thread_ = std::thread([this] { serve(); });
  }

  ~StubSmtp() {
    stop_.store(true);
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    thread_.join();
  }

  int port() const { return port_; }
  std::vector<std::string> messages() const {
    std::lock_guard lock(mutex_);
    return messages_;
  }

 private:
  void serve() {
    while (!stop_.load()) {
      int client = ::accept(fd_, nullptr, nullptr);
      if (client < 0) return;
      handle(client);
      ::close(client);
    }
  }

  static void reply(int client, const std::string& line) {
    std::string full = line + "\r\n";
    ::send(client, full.data(), full.size(), 0);
  }

  void handle(int client) {
    reply(client, "220 stub ready");
    std::string buffer;
    bool in_data = false;
    std::string payload;
    char chunk[512];
    for (;;) {
      ssize_t n = ::recv(client, chunk, sizeof(chunk), 0);
      if (n <= 0) return;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t pos;
      while ((pos = buffer.find("\r\n")) != std::string::npos) {
        std::string line = buffer.substr(0, pos);
        buffer.erase(0, pos + 2);
        if (in_data) {
          if (line == ".") {
            {
              std::lock_guard lock(mutex_);
              messages_.push_back(payload);
            }
            payload.clear();
            in_data = false;
            reply(client, "250 accepted");
          } else {
            payload += line + "\n";
          }
          continue;
        }
        if (line.rfind("EHLO", 0) == 0 || line.rfind("HELO", 0) == 0) {
          reply(client, "250-stub");
          reply(client, "250 OK");
        } else if (line.rfind("AUTH", 0) == 0) {
          reply(client, "235 accepted");
        } else if (line.rfind("MAIL", 0) == 0 || line.rfind("RCPT", 0) == 0) {
          reply(client, "250 OK");
        } else if (line.rfind("DATA", 0) == 0) {
          in_data = true;
          reply(client, "354 go ahead");
        } else if (line.rfind("QUIT", 0) == 0) {
          reply(client, "221 bye");
          return;
        } else {
          reply(client, "250 OK");
        }
      }
    }
  }

  int fd_ = -1;
  int port_ = 0;
  std::thread thread_;
  std::atomic<bool> stop_{false};
  mutable std::mutex mutex_;
  std::vector<std::string> messages_;
};

}  // namespace testing
