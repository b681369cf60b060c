from .field import (
    FFElem,
    FieldDesc,
    compositum,
    embed,
    ff_pth_root,
    ff_solve_artin_schreier,
    ff_solve_kummer,
    prime_field,
    standard_field,
)
