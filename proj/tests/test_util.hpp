#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

namespace testutil {

/// Fresh directory under the system temp root; unique per call.
inline std::filesystem::path make_temp_dir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("fairtransport-" + tag + "-" + std::to_string(rd()) + "-" +
                      std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testutil
