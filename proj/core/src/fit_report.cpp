#include "citekinetics/fit_report.hpp"

#include "citekinetics/errors.hpp"

namespace citek {

int n_free_params(ModelKind kind) {
    switch (kind) {
        case ModelKind::communication: return 5;
        case ModelKind::double_power_law: return 4;
        case ModelKind::lognormal: return 2;
        case ModelKind::stretched_exponential: return 2;
        case ModelKind::bessel: return 1;
        case ModelKind::tsallis: return 2;
    }
    throw DomainError("n_free_params: unknown model kind");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::communication: return "comm";
        case ModelKind::double_power_law: return "dpl";
        case ModelKind::lognormal: return "lognormal";
        case ModelKind::stretched_exponential: return "stretched";
        case ModelKind::bessel: return "bessel";
        case ModelKind::tsallis: return "tsallis";
    }
    throw DomainError("to_string: unknown model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "comm") return ModelKind::communication;
    if (name == "dpl") return ModelKind::double_power_law;
    if (name == "lognormal") return ModelKind::lognormal;
    if (name == "stretched") return ModelKind::stretched_exponential;
    if (name == "bessel") return ModelKind::bessel;
    if (name == "tsallis") return ModelKind::tsallis;
    throw ParseError("unknown model name: " + name);
}

std::string to_string(FitMethod method) {
    return method == FitMethod::mle ? "mle" : "chi2";
}

FitMethod fit_method_from_string(const std::string& name) {
    if (name == "mle") return FitMethod::mle;
    if (name == "chi2") return FitMethod::chi2;
    throw ParseError("unknown fit method: " + name);
}

}  // namespace citek
