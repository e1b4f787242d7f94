#include "mlar/notify.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdlib>
#include <cstring>
#include <fstream>

#include "mlar/extract.hpp"

namespace mlar {

std::string to_string(MailMode mode) {
  return mode == MailMode::DryRun ? "dry_run" : "smtp";
}

MailMode parse_mail_mode(const std::string& s) {
  if (s == "dry_run") return MailMode::DryRun;
  if (s == "smtp") return MailMode::Smtp;
  throw Error("bad mail mode", s);
}

void MailTransportConfig::validate() const {
  if (!is_valid_email(from_address)) {
    throw Error("configuration error", "bad from_address " + from_address);
  }
  if (mode == MailMode::Smtp) {
    if (host.empty()) throw Error("configuration error", "smtp needs host");
    if (port < 1 || port > 65535) {
      throw Error("configuration error", "bad smtp port");
    }
  } else if (outbox_path.empty()) {
    throw Error("configuration error", "dry_run needs outbox_path");
  }
}

Json MailTransportConfig::to_json() const {
  return Json{{"mode", to_string(mode)},
              {"host", host},
              {"port", port},
              {"username", username},
              {"password_env_var", password_env_var},
              {"from_address", from_address},
              {"outbox_path", outbox_path.string()}};
}

MailTransportConfig MailTransportConfig::from_json(const Json& j) {
  MailTransportConfig c;
  c.mode = parse_mail_mode(j.value("mode", "dry_run"));
  c.host = j.value("host", std::string{});
  c.port = j.value("port", 25);
  c.username = j.value("username", std::string{});
  c.password_env_var =
      j.value("password_env_var", std::string{"MLAR_SMTP_PASSWORD"});
  c.from_address = j.value("from_address", std::string{"recruiting@example.com"});
  c.outbox_path = j.value("outbox_path", std::string{"outbox.jsonl"});
  return c;
}

std::string to_string(DeliveryStatus status) {
  switch (status) {
    case DeliveryStatus::Sent: return "sent";
    case DeliveryStatus::DryRun: return "dry_run";
    case DeliveryStatus::Failed: return "failed";
  }
  return "failed";
}

NotificationMessage generate_response(const ResumeFeatures& resume,
                                      const JobFeatures& job,
                                      const std::string& body_template) {
  if (!resume.email) {
    throw Error("unnotifiable candidate",
                resume.candidate_name + " has no email address");
  }
  NotificationMessage m;
  m.job_id = job.job_id;
  m.resume_id = resume.resume_id;
  m.recipient = *resume.email;
  m.subject = "Application update: " + job.title;
  m.body = render_template(body_template,
                           {{"candidate_name", resume.candidate_name},
                            {"job_title", job.title},
                            {"department", to_label(job.department)}});
  m.dry_run = false;
  return m;
}

namespace {

// Minimal blocking SMTP submission (RFC 5321), one message, no retry.
class SmtpSession {
 public:
  ~SmtpSession() {
    if (fd_ >= 0) ::close(fd_);
  }

  std::string connect(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    if (getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints,
                    &result) != 0) {
      return "cannot resolve " + host;
    }
    for (addrinfo* rp = result; rp; rp = rp->ai_next) {
      fd_ = ::socket(rp->ai_family, rp->ai_socktype, rp->ai_protocol);
      if (fd_ < 0) continue;
      if (::connect(fd_, rp->ai_addr, rp->ai_addrlen) == 0) break;
      ::close(fd_);
      fd_ = -1;
    }
    freeaddrinfo(result);
    if (fd_ < 0) return "connection refused by " + host;
    return {};
  }

  // Sends a command (empty for the greeting) and checks the reply code.
  std::string exchange(const std::string& command, int expected) {
    if (!command.empty()) {
      std::string line = command + "\r\n";
      if (!send_all(line)) return "send failed during " + command;
    }
    std::string reply = read_reply();
    if (reply.size() < 3 ||
        std::atoi(reply.substr(0, 3).c_str()) != expected) {
      return "unexpected reply '" + trim(reply) + "' to '" +
             (command.empty() ? "<greeting>" : command) + "'";
    }
    return {};
  }

  bool send_all(std::string_view data) {
    while (!data.empty()) {
      ssize_t n = ::send(fd_, data.data(), data.size(), 0);
      if (n <= 0) return false;
      data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
  }

 private:
  std::string read_reply() {
    std::string reply;
    char buf[512];
    for (;;) {
      ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
      if (n <= 0) return reply;
      reply.append(buf, static_cast<std::size_t>(n));
      if (!reply.ends_with("\n")) continue;
      // multi-line replies continue while the last line has '-' after the code
      std::size_t start = reply.rfind('\n', reply.size() - 2);
      std::string_view tail = std::string_view(reply).substr(
          start == std::string::npos ? 0 : start + 1);
      if (tail.size() < 4 || tail[3] != '-') return reply;
    }
  }

  int fd_ = -1;
};

std::string base64_encode(std::string_view in) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < in.size(); i += 3) {
    std::uint32_t chunk = static_cast<unsigned char>(in[i]) << 16;
    if (i + 1 < in.size()) chunk |= static_cast<unsigned char>(in[i + 1]) << 8;
    if (i + 2 < in.size()) chunk |= static_cast<unsigned char>(in[i + 2]);
    out.push_back(alphabet[(chunk >> 18) & 0x3f]);
    out.push_back(alphabet[(chunk >> 12) & 0x3f]);
    out.push_back(i + 1 < in.size() ? alphabet[(chunk >> 6) & 0x3f] : '=');
    out.push_back(i + 2 < in.size() ? alphabet[chunk & 0x3f] : '=');
  }
  return out;
}

std::string dot_stuffed_body(const std::string& body) {
  std::string out;
  out.reserve(body.size() + 16);
  bool at_line_start = true;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '\n' && (i == 0 || body[i - 1] != '\r')) out.push_back('\r');
    if (at_line_start && c == '.') out.push_back('.');
    out.push_back(c);
    at_line_start = c == '\n';
  }
  if (!out.ends_with("\r\n")) out += "\r\n";
  return out;
}

std::string smtp_submit(const NotificationMessage& message,
                        const MailTransportConfig& transport) {
  SmtpSession session;
  if (std::string err = session.connect(transport.host, transport.port);
      !err.empty()) {
    return err;
  }
  if (std::string err = session.exchange("", 220); !err.empty()) return err;
  if (std::string err = session.exchange("EHLO mlar.local", 250); !err.empty()) {
    return err;
  }
  if (!transport.username.empty()) {
    const char* password = std::getenv(transport.password_env_var.c_str());
    std::string token;
    token.push_back('\0');
    token += transport.username;
    token.push_back('\0');
    token += password ? password : "";
    if (std::string err = session.exchange(
            "AUTH PLAIN " + base64_encode(token), 235);
        !err.empty()) {
      return err;
    }
  }
  if (std::string err = session.exchange(
          "MAIL FROM:<" + transport.from_address + ">", 250);
      !err.empty()) {
    return err;
  }
  if (std::string err =
          session.exchange("RCPT TO:<" + message.recipient + ">", 250);
      !err.empty()) {
    return err;
  }
  if (std::string err = session.exchange("DATA", 354); !err.empty()) {
    return err;
  }
  std::string payload;
  payload += "From: <" + transport.from_address + ">\r\n";
  payload += "To: <" + message.recipient + ">\r\n";
  payload += "Subject: " + message.subject + "\r\n";
  payload += "MIME-Version: 1.0\r\n";
  payload += "Content-Type: text/plain; charset=utf-8\r\n";
  payload += "\r\n";
  payload += dot_stuffed_body(message.body);
  payload += ".\r\n";
  if (!session.send_all(payload)) return "send failed during DATA";
  if (std::string err = session.exchange("", 250); !err.empty()) return err;
  session.exchange("QUIT", 221);
  return {};
}

}  // namespace

DeliveryReceipt send(const NotificationMessage& message,
                     const MailTransportConfig& transport) {
  DeliveryReceipt receipt;
  receipt.message = message;
  receipt.message.dry_run = transport.mode == MailMode::DryRun;
  receipt.at = now_utc();
  if (transport.mode == MailMode::DryRun) {
    std::ofstream out(transport.outbox_path,
                      std::ios::binary | std::ios::app);
    if (!out) {
      receipt.status = DeliveryStatus::Failed;
      receipt.detail = "cannot open outbox " + transport.outbox_path.string();
      return receipt;
    }
    out << Json(receipt.message).dump() << "\n";
    out.flush();
    receipt.status = out ? DeliveryStatus::DryRun : DeliveryStatus::Failed;
    if (!out) receipt.detail = "short write to outbox";
    return receipt;
  }
  std::string error = smtp_submit(receipt.message, transport);
  if (error.empty()) {
    receipt.status = DeliveryStatus::Sent;
  } else {
    receipt.status = DeliveryStatus::Failed;
    receipt.detail = error;
  }
  return receipt;
}

}  // namespace mlar
