#include "relcycle/serialize.hpp"

#include <fstream>
#include <stdexcept>
#include <system_error>

namespace relcycle::serialize {

using nlohmann::json;

json phase_to_json(const reduction::PhaseShift& phase) {
    json j;
    if (const auto* se2 = std::get_if<lie::SE2Element>(&phase.group_element)) {
        j["group"] = "SE2";
        j["theta"] = se2->theta;
        j["tx"] = se2->tx;
        j["ty"] = se2->ty;
    } else {
        const auto& shift = std::get<lie::TranslationElement>(phase.group_element).shift;
        j["group"] = "R" + std::to_string(shift.size());
        j["theta"] = 0.0;
        j["tx"] = shift.size() > 0 ? shift[0] : 0.0;
        j["ty"] = 0.0;
        j["shift"] = std::vector<double>(shift.data(), shift.data() + shift.size());
    }
    j["period"] = phase.period;
    j["residual"] = phase.residual;
    return j;
}

json certificate_to_json(const cycles::CycleCertificate& cert) {
    json j;
    j["epsilon"] = cert.epsilon;
    j["anchor"] = std::vector<double>(cert.anchor.data(), cert.anchor.data() + cert.anchor.size());
    j["period"] = cert.period;
    json mults = json::array();
    for (const auto& m : cert.multipliers) mults.push_back({{"re", m.real()}, {"im", m.imag()}});
    j["multipliers"] = mults;
    j["contraction_rate"] = cert.contraction_rate;
    j["residual"] = cert.newton_residual;
    j["stability"] = cycles::to_string(cert.stability);
    if (cert.phase) j["phase"] = phase_to_json(*cert.phase);
    return j;
}

cycles::CycleCertificate certificate_from_json(const json& j) {
    cycles::CycleCertificate c;
    c.epsilon = j.at("epsilon").get<double>();
    const auto anchor = j.at("anchor").get<std::vector<double>>();
    c.anchor = Eigen::Map<const Eigen::VectorXd>(anchor.data(), static_cast<Eigen::Index>(anchor.size()));
    c.period = j.at("period").get<double>();
    const auto& mults = j.at("multipliers");
    c.multipliers.resize(static_cast<Eigen::Index>(mults.size()));
    for (std::size_t i = 0; i < mults.size(); ++i) {
        c.multipliers[static_cast<Eigen::Index>(i)] = {mults[i].at("re").get<double>(),
                                                       mults[i].at("im").get<double>()};
    }
    c.contraction_rate = j.at("contraction_rate").get<double>();
    c.newton_residual = j.at("residual").get<double>();
    c.stability = cycles::classify(c.multipliers);
    if (j.contains("phase")) {
        const auto& p = j["phase"];
        reduction::PhaseShift ph;
        if (p.value("group", "SE2") == "SE2") {
            ph.group_element = lie::SE2Element{p.at("theta").get<double>(), p.at("tx").get<double>(),
                                               p.at("ty").get<double>()};
        } else {
            const auto shift = p.at("shift").get<std::vector<double>>();
            ph.group_element = lie::TranslationElement{Eigen::Map<const Eigen::VectorXd>(
                shift.data(), static_cast<Eigen::Index>(shift.size()))};
        }
        ph.period = p.at("period").get<double>();
        ph.residual = p.at("residual").get<double>();
        c.phase = ph;
    }
    return c;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace relcycle::serialize
