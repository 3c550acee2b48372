#pragma once

namespace hrstat {

// Standard normal CDF.
double normal_cdf(double x);

// Standard Cauchy CDF.
double cauchy_cdf(double x);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double inc_beta(double a, double b, double x);

// Student-t CDF with nu degrees of freedom.
double student_t_cdf(double x, double nu);

}  // namespace hrstat
