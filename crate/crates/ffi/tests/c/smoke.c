#include <math.h>
#include <stdio.h>
#include "oilsec.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(int argc, char **argv) {
  CHECK(argc == 2);
  printf("oilsec %s\n", oilsec_version());

  OilsecModel *m = oilsec_model_new();
  OilsecChannel ch = {0.2, 200.0};
  CHECK(oilsec_model_set_channel(m, &ch) == OILSEC_STATUS_OK);

  OilsecOptimization opt;
  CHECK(oilsec_optimize(m, &opt) == OILSEC_STATUS_OK);
  CHECK(opt.best_rate > 0.0);

  double rate = 0.0;
  CHECK(oilsec_secret_key_rate(m, opt.best_mu, opt.best_mu, &rate) == OILSEC_STATUS_OK);
  CHECK(rate > 0.0);

  OilsecProtocol p;
  CHECK(oilsec_model_get_protocol(m, &p) == OILSEC_STATUS_OK);
  p.send_prob = 2.0;
  CHECK(oilsec_model_set_protocol(m, &p) == OILSEC_STATUS_INVALID_ARGUMENT);
  CHECK(oilsec_last_error() != NULL);
  printf("rejected: %s\n", oilsec_last_error());

  CHECK(oilsec_secret_key_rate(NULL, 0.5, 0.5, &rate) == OILSEC_STATUS_NULL_POINTER);

  double d[3] = {0.0, 100.0, 200.0};
  OilsecSweepRow rows[3];
  CHECK(oilsec_attack_sweep(m, d, 3, 1.0, rows) == OILSEC_STATUS_OK);
  CHECK(rows[2].rate_expected == rows[2].rate_oblivious);
  oilsec_model_free(m);

  OilsecProfile *iso = NULL;
  CHECK(oilsec_profile_load(argv[1], OILSEC_PROFILE_KIND_ATTENUATION, &iso) == OILSEC_STATUS_OK);
  const OilsecProfile *list[2] = {iso, iso};
  OilsecBudgetReport rep;
  CHECK(oilsec_budget_report(1550.0, list, 2, 1e9, 1e-6, &rep) == OILSEC_STATUS_OK);
  CHECK(fabs(rep.total_isolation_db - 84.0) < 1e-9);
  double v;
  CHECK(oilsec_profile_value_at(iso, 9000.0, &v) == OILSEC_STATUS_OUT_OF_RANGE);
  oilsec_profile_free(iso);

  printf("ok\n");
  return 0;
}
