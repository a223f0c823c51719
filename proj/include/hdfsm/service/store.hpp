#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdfsm/core/model.hpp"
#include "hdfsm/editing/history.hpp"
#include "hdfsm/orchestration/exchange.hpp"

namespace hdfsm {

struct StoreOptions {
  bool durable = true;  // fsync files and directories
  // Runs after the temp file is complete and before it replaces `target`.
  std::function<void(const std::filesystem::path& target)> before_rename;
};

// Writes `<target>.tmp`, syncs it, then renames over `target`.
void atomic_write(const std::filesystem::path& target, std::string_view data,
                  const StoreOptions& options);

struct ProjectMeta {
  std::string id;
  std::string title;
  MaterialSource source = MaterialSource::pasted;
  std::optional<std::string> imported_name;
  std::string created_at;
  // Approval holds only while the plan still hashes to this value.
  std::optional<std::string> approved_plan_hash;
};

struct StoredProject {
  ProjectMeta meta;
  Material material;
  std::vector<LogEvent> log;
  std::size_t exchange_count = 0;
};

// One folder per project:
//   meta.json  material.txt  plan.json  <session>.hdfsm
//   edit-log.jsonl  exchanges.jsonl
// The edit log is authoritative for plan and dialogues; plan.json and the
// .hdfsm files are derived copies kept in step by sync_content.
class ProjectStore {
 public:
  explicit ProjectStore(std::filesystem::path root, StoreOptions options = {});

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path dir(const std::string& id) const;

  // Allocates the next free id "p<n>" and persists material and meta.
  std::string create(const std::string& title, const Material& material,
                     const std::string& created_at);
  bool exists(const std::string& id) const;
  std::vector<std::string> list() const;

  // Drops leftover temp files and torn trailing log lines.
  StoredProject load(const std::string& id);

  void append_log(const std::string& id, const LogEvent& event);
  void append_exchanges(const std::string& id, const std::vector<LlmExchange>& exchanges);
  void write_meta(const ProjectMeta& meta);
  // Rewrites whichever derived files differ from `content`.
  void sync_content(const std::string& id, const ProjectContent& content);

  static std::string session_file_text(const SessionTopic* topic, const DialogueFsm& fsm);

 private:
  void append_lines(const std::filesystem::path& file, const std::string& lines);

  std::filesystem::path root_;
  StoreOptions options_;
  std::mutex create_mu_;
  std::size_t next_id_ = 0;  // 0 until the root has been scanned
};

}  // namespace hdfsm
