#include "hdfsm/service/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hdfsm/core/error.hpp"
#include "hdfsm/markup/plan_json.hpp"
#include "hdfsm/markup/serializer.hpp"

namespace fs = std::filesystem;

namespace hdfsm {

namespace {

constexpr const char* kMeta = "meta.json";
constexpr const char* kMaterial = "material.txt";
constexpr const char* kPlan = "plan.json";
constexpr const char* kEditLog = "edit-log.jsonl";
constexpr const char* kExchanges = "exchanges.jsonl";
constexpr const char* kTmpSuffix = ".tmp";

[[noreturn]] void io_failure(const std::string& what, const fs::path& p) {
  throw Error(ErrorCode::storage, what + " " + p.string() + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view data, const fs::path& p) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      io_failure("cannot write", p);
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

void sync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Complete lines only; a torn final line is cut off the file.
std::vector<std::string> read_lines(const fs::path& p) {
  std::vector<std::string> lines;
  auto text = read_file(p);
  if (!text) return lines;
  const auto last_nl = text->rfind('\n');
  const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
  if (keep != text->size()) {
    fs::resize_file(p, keep);
    text->resize(keep);
  }
  std::size_t pos = 0;
  while (pos < text->size()) {
    const auto eol = text->find('\n', pos);
    if (eol > pos) lines.push_back(text->substr(pos, eol - pos));
    pos = eol + 1;
  }
  return lines;
}

nlohmann::json meta_json(const ProjectMeta& m) {
  nlohmann::json j = {{"id", m.id},
                      {"title", m.title},
                      {"source", std::string(to_string(m.source))},
                      {"created_at", m.created_at},
                      {"approved_plan_hash", nullptr}};
  if (m.imported_name) j["imported_name"] = *m.imported_name;
  if (m.approved_plan_hash) j["approved_plan_hash"] = *m.approved_plan_hash;
  return j;
}

ProjectMeta meta_from(const nlohmann::json& j) {
  ProjectMeta m;
  m.id = j.at("id").get<std::string>();
  m.title = j.at("title").get<std::string>();
  m.source = material_source_from_string(j.value("source", std::string("pasted")))
                 .value_or(MaterialSource::pasted);
  if (j.contains("imported_name") && j["imported_name"].is_string()) {
    m.imported_name = j["imported_name"].get<std::string>();
  }
  m.created_at = j.value("created_at", std::string{});
  if (j.contains("approved_plan_hash") && j["approved_plan_hash"].is_string()) {
    m.approved_plan_hash = j["approved_plan_hash"].get<std::string>();
  }
  return m;
}

void write_plain(const fs::path& p, std::string_view data, bool durable) {
  const int fd = ::open(p.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_failure("cannot create", p);
  write_all(fd, data, p);
  if (durable && ::fsync(fd) != 0) {
    ::close(fd);
    io_failure("cannot sync", p);
  }
  ::close(fd);
}

}  // namespace

void atomic_write(const fs::path& target, std::string_view data, const StoreOptions& options) {
  fs::path tmp = target;
  tmp += kTmpSuffix;
  write_plain(tmp, data, options.durable);
  if (options.before_rename) options.before_rename(target);
  if (::rename(tmp.c_str(), target.c_str()) != 0) io_failure("cannot rename onto", target);
  if (options.durable) sync_dir(target.parent_path());
}

ProjectStore::ProjectStore(fs::path root, StoreOptions options)
    : root_(std::move(root)), options_(std::move(options)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::storage, "cannot create store root " + root_.string());
}

fs::path ProjectStore::dir(const std::string& id) const {
  if (!is_valid_identifier(id)) throw Error(ErrorCode::not_found, "no project " + id);
  return root_ / id;
}

bool ProjectStore::exists(const std::string& id) const {
  if (!is_valid_identifier(id)) return false;
  std::error_code ec;
  return fs::is_regular_file(root_ / id / kMeta, ec);
}

std::vector<std::string> ProjectStore::list() const {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root_, ec)) {
    const auto name = entry.path().filename().string();
    if (exists(name)) out.push_back(name);
  }
  std::sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

std::string ProjectStore::create(const std::string& title, const Material& material,
                                 const std::string& created_at) {
  std::lock_guard lock(create_mu_);
  if (next_id_ == 0) {
    next_id_ = 1;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root_, ec)) {
      const auto name = entry.path().filename().string();
      if (name.size() > 1 && name[0] == 'p' &&
          name.find_first_not_of("0123456789", 1) == std::string::npos && name.size() < 19) {
        next_id_ = std::max<std::size_t>(next_id_, std::stoull(name.substr(1)) + 1);
      }
    }
  }
  for (std::size_t n = next_id_;; ++n) {
    const std::string id = "p" + std::to_string(n);
    std::error_code ec;
    if (fs::exists(root_ / id, ec)) continue;

    const fs::path staging = root_ / ("." + id + ".creating");
    fs::remove_all(staging, ec);
    fs::create_directories(staging);
    write_plain(staging / kMaterial, material.body, options_.durable);
    ProjectMeta meta{id, title, material.source, material.imported_name, created_at, std::nullopt};
    write_plain(staging / kMeta, meta_json(meta).dump(2) + "\n", options_.durable);
    if (::rename(staging.c_str(), (root_ / id).c_str()) != 0) {
      // Another process took this id first.
      fs::remove_all(staging, ec);
      if (errno == ENOTEMPTY || errno == EEXIST) continue;
      io_failure("cannot publish project", root_ / id);
    }
    if (options_.durable) sync_dir(root_);
    next_id_ = n + 1;
    return id;
  }
}

StoredProject ProjectStore::load(const std::string& id) {
  if (!exists(id)) throw Error(ErrorCode::not_found, "no project " + id);
  const fs::path d = dir(id);
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(d, ec)) {
    if (entry.path().extension() == kTmpSuffix) fs::remove(entry.path(), ec);
  }

  StoredProject p;
  const auto meta = nlohmann::json::parse(read_file(d / kMeta).value_or(""), nullptr, false);
  if (meta.is_discarded()) throw Error(ErrorCode::storage, "unreadable meta.json in " + id);
  try {
    p.meta = meta_from(meta);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::storage, std::string("malformed meta.json: ") + e.what());
  }
  p.material = Material{id, p.meta.title, read_file(d / kMaterial).value_or(""), p.meta.source,
                        p.meta.imported_name};
  for (const auto& line : read_lines(d / kEditLog)) {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::storage, "corrupt edit log line in " + id);
    p.log.push_back(log_event_from_json(j));
  }
  p.exchange_count = read_lines(d / kExchanges).size();
  return p;
}

void ProjectStore::append_lines(const fs::path& file, const std::string& lines) {
  const int fd = ::open(file.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) io_failure("cannot open", file);
  write_all(fd, lines, file);
  if (options_.durable && ::fsync(fd) != 0) {
    ::close(fd);
    io_failure("cannot sync", file);
  }
  ::close(fd);
}

void ProjectStore::append_log(const std::string& id, const LogEvent& event) {
  append_lines(dir(id) / kEditLog,
               log_event_to_json(event).dump(-1, ' ', false,
                                             nlohmann::json::error_handler_t::replace) +
                   "\n");
}

void ProjectStore::append_exchanges(const std::string& id,
                                    const std::vector<LlmExchange>& exchanges) {
  if (exchanges.empty()) return;
  std::string lines;
  for (const auto& e : exchanges) {
    lines += nlohmann::json(e).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    lines += '\n';
  }
  append_lines(dir(id) / kExchanges, lines);
}

void ProjectStore::write_meta(const ProjectMeta& meta) {
  atomic_write(dir(meta.id) / kMeta, meta_json(meta).dump(2) + "\n", options_);
}

std::string ProjectStore::session_file_text(const SessionTopic* topic, const DialogueFsm& fsm) {
  markup::MarkupDocument doc;
  doc.dialogues.push_back({topic ? topic->title : fsm.session_id, fsm});
  return markup::serialize(doc);
}

void ProjectStore::sync_content(const std::string& id, const ProjectContent& content) {
  const fs::path d = dir(id);
  auto put = [&](const fs::path& p, const std::string& text) {
    if (read_file(p) != text) atomic_write(p, text, options_);
  };
  std::error_code ec;
  if (content.plan.sessions.empty()) {
    fs::remove(d / kPlan, ec);
  } else {
    put(d / kPlan, markup::serialize_session_plan_json(content.plan));
  }
  std::set<std::string> wanted;
  for (const auto& [sid, fsm] : content.fsms) {
    const std::string name = sid + std::string(markup::kFileExtension);
    wanted.insert(name);
    put(d / name, session_file_text(content.plan.find(sid), fsm));
  }
  for (const auto& entry : fs::directory_iterator(d, ec)) {
    const auto name = entry.path().filename().string();
    if (entry.path().extension() == markup::kFileExtension && !wanted.count(name)) {
      fs::remove(entry.path(), ec);
    }
  }
}

}  // namespace hdfsm
