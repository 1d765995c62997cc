"""
Ranking methods with EDAS
=========================

Ten detectors scored on two datasets. Each score is compared with the
criterion mean; falling short counts against a method, and the lowest
appraisal score ranks first.
"""

import numpy as np

from focusseg.edas import DecisionMatrix, edas

names = ["Tang13", "Tang16", "Xu", "Karaali", "Su", "Shi", "Javaran", "Yi", "Ma", "Ours"]
scores = np.array([
    [0.4414, 0.7783], [0.6189, 0.8975], [0.5145, 0.8785], [0.5326, 0.8877], [0.6896, 0.8438],
    [0.5933, 0.8611], [0.7184, 0.8968], [0.7491, 0.8878], [0.7851, 0.9088], [0.7941, 0.9178],
])
m = DecisionMatrix(names, ["zhao", "shi"], scores, weights=[0.5, 0.166667],
                   benefit=[True, True], fixed_means=[0.7152, 0.9731])

res = edas(m)
print(f"{'method':8} {'sp':>9} {'sn':>9} {'AS':>9} rank")
for i in np.argsort(res.rank):
    print(f"{names[i]:8} {res.sp[i]:9.6f} {res.sn[i]:9.6f} {res.as_score[i]:9.6f} {res.rank[i]:4d}")

###############################################################################
# The textbook orientation rewards distance above the mean and ranks by the
# highest score. On this matrix the two ends of the order agree.
canon = edas(m, mode="canonical")
print("canonical order:", [names[i] for i in np.argsort(canon.rank)])
