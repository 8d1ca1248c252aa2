#ifndef ZIPFMF_TESTS_TMPDIR_HPP
#define ZIPFMF_TESTS_TMPDIR_HPP

#include <atomic>
#include <filesystem>
#include <string>

namespace zipfmf::testsupport {

// Self-cleaning unique directory under the system temp root.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("zipfmf-" + tag + "-" + std::to_string(counter.fetch_add(1)) +
                 "-" + std::to_string(static_cast<unsigned>(
                           std::hash<std::string>{}(tag) & 0xffffu)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const {
        return (path_ / name).string();
    }

  private:
    std::filesystem::path path_;
};

}  // namespace zipfmf::testsupport

#endif
