#include "spincs/harness.hpp"

#include <iostream>

using namespace spincs;

namespace {

const char* const kCriteria[] = {
    "",
    "fermion anticommutation relations on random modes and states",
    "affine gl_s and Heisenberg commutators on graded components",
    "degenerate affine Hecke relations, symbolic beta",
    "Yangian relations of the finite-N representation",
    "quantum determinant coefficients commute",
    "bosonic inclusion, symmetrization, Dunkl and Yangian pullbacks",
    "shift map against omega",
    "antisymmetrization pullback for E_ab D^n Psi",
    "Dunkl pullback intertwines pi_N",
    "Yangian generators intertwine pi_N",
    "NORMAL_ORDERED = RECURRENT = COMPOSITIONAL for k + l <= 2",
    "<vac_N|T^{2,0}_11|vac_N> = (2N^3 - 3N^2 + N)/6 for N = 0..5",
    "Yangian relations and ad_Q^{n+1} nilpotency on Fock components (EVIDENCE)",
    "compositional T invariant under doubling the cutoff",
};

}  // namespace

int main(int argc, char** argv) {
    std::string config = argc > 1 ? argv[1] : std::string(SPINCS_DATA_DIR) + "/configs/default.cfg";
    std::string report = argc > 2 ? argv[2] : "acceptance_report.json";
    SuiteConfig cfg = load_config(config);
    cfg.timing = true;
    SuiteReport R = run_suite(cfg, [](const CheckDef& d, const ordered_json& j) {
        std::cerr << "  " << j["status"].get<std::string>() << "  " << d.id << "  (" << j["seconds"].get<double>()
                  << " s)\n";
    });

    std::map<int, std::vector<const ordered_json*>> by_criterion, supplements;
    for (const auto& j : R.json["checks"]) {
        if (j.contains("criterion")) by_criterion[j["criterion"].get<int>()].push_back(&j);
        if (j.contains("supplements")) supplements[j["supplements"].get<int>()].push_back(&j);
    }

    bool all_pass = true;
    for (int k = 1; k <= 14; ++k) {
        const auto& list = by_criterion[k];
        bool pass = !list.empty();
        double secs = 0;
        std::string failed;
        for (const auto* j : list) {
            secs += (*j)["seconds"].get<double>();
            if ((*j)["status"] == "FAILED") {
                pass = false;
                failed += " " + (*j)["id"].get<std::string>();
            }
        }
        all_pass = all_pass && pass;
        std::cout << "criterion " << k << ": " << (pass ? "PASS" : "FAIL") << "  " << kCriteria[k];
        if (!failed.empty()) std::cout << "  [failed:" << failed << "]";
        std::cout << "  (" << static_cast<int>(secs + 0.5) << " s)\n";
        for (const auto* j : supplements[k])
            std::cout << "  supplementary to " << k << ": " << (*j)["status"].get<std::string>() << "  "
                      << (*j)["identity"].get<std::string>() << "\n";
    }

    std::ofstream out(report);
    out << R.json.dump(2) << "\n";
    std::cout << "report: " << report << "\n";
    return all_pass ? 0 : 1;
}
