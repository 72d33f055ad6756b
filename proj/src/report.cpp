#include "orbivortex/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace orbivortex::cli {

std::string timestamp_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json make_report(const std::string& command, const nlohmann::json& config,
                           const nlohmann::json& result) {
    return nlohmann::json{{"version", kToolVersion},
                          {"timestamp", timestamp_utc()},
                          {"command", command},
                          {"config", config},
                          {"result", result}};
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& text) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("write to " + tmp + " failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot move " + tmp + " into place");
    }
}

void emit_report(const nlohmann::json& report, const std::string& path) {
    std::string text = report.dump(2) + "\n";
    if (path.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_text_atomic(path, text);
}

void write_csv(const std::string& path, const std::string& provenance,
               const std::string& header, const std::vector<std::string>& rows) {
    std::string text = "# " + provenance + "\n" + header + "\n";
    for (const auto& r : rows) text += r + "\n";
    write_text_atomic(path, text);
}

} // namespace orbivortex::cli
