#pragma once

#include <span>
#include <vector>

namespace rwd {

double norm_pdf(double x);
double norm_cdf(double x);
// Inverse standard-normal CDF (Acklam's rational approximation + one
// Halley refinement; absolute error well below 1e-12 on (0,1)).
double norm_inv(double p);

// Upper-tail probability of a chi-square variable with k dof.
double chi2_sf(double x, int dof);

// Asymptotic Kolmogorov distribution survival function used by the
// one-sample KS test, with the Stephens small-sample correction.
double kolmogorov_pvalue(double d_stat, int n);

struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double skewness = 0.0;
    double kurtosis = 0.0;  // non-excess
};
SampleMoments sample_moments(std::span<const double> xs);

// Silverman's rule of thumb: h = 0.9 min(s, IQR/1.34) n^{-1/5}.
double silverman_bandwidth(std::span<const double> xs);

// Gaussian kernel density estimate over a fixed sample.
class GaussianKde {
public:
    GaussianKde(std::vector<double> sample, double bandwidth);
    static GaussianKde with_silverman(std::vector<double> sample);

    double pdf(double x) const;
    double cdf(double x) const;
    double bandwidth() const { return h_; }
    std::size_t size() const { return sample_.size(); }

private:
    std::vector<double> sample_;
    double h_;
};

}  // namespace rwd
