#pragma once

#include <filesystem>
#include <string>

#include "mlar/domain.hpp"

namespace mlar {

enum class MailMode { DryRun, Smtp };

std::string to_string(MailMode mode);
MailMode parse_mail_mode(const std::string& s);

struct MailTransportConfig {
  MailMode mode = MailMode::DryRun;
  std::string host;  // Smtp only
  int port = 25;
  std::string username;
  std::string password_env_var = "MLAR_SMTP_PASSWORD";
  std::string from_address = "recruiting@example.com";
  std::filesystem::path outbox_path = "outbox.jsonl";  // DryRun only

  void validate() const;
  Json to_json() const;
  static MailTransportConfig from_json(const Json& j);
};

enum class DeliveryStatus { Sent, DryRun, Failed };

std::string to_string(DeliveryStatus status);

struct DeliveryReceipt {
  NotificationMessage message;
  DeliveryStatus status = DeliveryStatus::DryRun;
  std::string detail;
  UtcSeconds at{};
};

// Renders the acceptance message. Deterministic; requires resume.email
// (otherwise Error("unnotifiable candidate")).
NotificationMessage generate_response(const ResumeFeatures& resume,
                                      const JobFeatures& job,
                                      const std::string& body_template);

// DryRun appends to the outbox file; Smtp submits one RFC 5322 message with
// no retry. Transport failures become a Failed receipt, never an exception.
DeliveryReceipt send(const NotificationMessage& message,
                     const MailTransportConfig& transport);

}  // namespace mlar
