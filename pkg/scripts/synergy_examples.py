"""Region summary and corner schedules for the four alternating-CSIT examples.

    python3 scripts/synergy_examples.py
"""

from altcsit.composer import (Corner, compose_corner, corner_value,
                              format_schedule, subcase_of, validate_schedule)
from altcsit.region import Case, LambdaPmf, case_of, corner_points, marginals, sum_dof

EXAMPLES = [
    ('PD/DP alternation', {'PD': '1/2'}),
    ('DD with PN/NP', {'DD': '1/5', 'PN': '2/5'}),
    ('PN/NP alternation', {'PN': '1/2'}),
    ('DD with NN', {'DD': '1/3', 'NN': '2/3'}),
]


def main():
    for title, spec in EXAMPLES:
        pmf = LambdaPmf.from_mapping(spec, mirror=True)
        m = marginals(pmf)
        case = case_of(m)
        print(f'== {title}: {pmf}')
        print(f'marginals P={m.lambda_p} D={m.lambda_d} N={m.lambda_n}  case {case}  '
              f'subcase {subcase_of(pmf)}  sum-DoF {sum_dof(m)}')
        print('corners ' + ' '.join(str(c) for c in corner_points(m)))
        corner = Corner.P0 if case is Case.A else Corner.P1STAR
        sched = compose_corner(pmf, corner)
        nonzero = type(sched)(tuple(r for r in sched.rows if r.fraction), sched.label)
        report = validate_schedule(pmf, sched, corner_value(pmf, corner))
        print(format_schedule(nonzero, report=report))


if __name__ == '__main__':
    main()
