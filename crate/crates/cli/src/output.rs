//! CSV writers. Every real number is printed with six decimals so that
//! files diff cleanly between runs.

use std::io::{self, Write};

use greenepq_core::pareto::{BruteForceFront, FrontRun};
use greenepq_core::{EvaluatedPoint, ObjectivePair, SolveResult, SweepResult, Trajectory};

pub const FRONT_HEADER: &str = "w1,w2,subproblem,Qp,Qr,m,n,s,cost,obj2,feasible,is_pareto";
pub const SWEEP_HEADER: &str = "axis1,axis2,Qp,Qr,m,n,s,cost,status";
pub const BRUTE_HEADER: &str = "Qp,Qr,cost,obj2,is_pareto";
pub const TRAJECTORY_HEADER: &str = "t,supply_level,repair_level";
pub const OPTIMUM_HEADER: &str = "Qp,Qr,m,n,s,cost,ghg,energy,status";

pub fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn write_front(w: &mut impl Write, run: &FrontRun, pair: ObjectivePair) -> io::Result<()> {
    writeln!(w, "{FRONT_HEADER}")?;
    for o in &run.outcomes {
        let head = format!("{},{},{}", num(o.weight.w1), num(o.weight.w2), o.subproblem.index());
        match &o.point {
            Some(p) => {
                let d = p.decision;
                let (cost, obj2) = pair.values(p).expect("pair checked before solving");
                writeln!(
                    w,
                    "{head},{},{},{},{},{},{},{},true,{}",
                    d.production_lot,
                    d.repair_lot,
                    d.repair_cycles,
                    d.production_cycles,
                    num(d.return_quality),
                    num(cost),
                    num(obj2),
                    o.is_pareto
                )?;
            }
            None => writeln!(w, "{head},,,,,,,,false,false")?,
        }
    }
    Ok(())
}

pub fn write_brute_force(w: &mut impl Write, bf: &BruteForceFront) -> io::Result<()> {
    writeln!(w, "{BRUTE_HEADER}")?;
    for p in &bf.points {
        writeln!(
            w,
            "{},{},{},{},{}",
            p.production_lot,
            p.repair_lot,
            num(p.cost),
            num(p.obj2),
            p.is_pareto
        )?;
    }
    Ok(())
}

pub fn write_sweep(w: &mut impl Write, res: &SweepResult) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for row in &res.rows {
        let axis2 = row.values.get(1).copied();
        write!(w, "{},{},", num(row.values[0]), opt(axis2))?;
        match row.decision {
            Some(d) => write!(
                w,
                "{},{},{},{},{},",
                d.production_lot,
                d.repair_lot,
                d.repair_cycles,
                d.production_cycles,
                num(d.return_quality)
            )?,
            None => write!(w, ",,,,,")?,
        }
        writeln!(w, "{},{}", opt(row.cost), row.status.as_str())?;
    }
    Ok(())
}

pub fn write_trajectory(w: &mut impl Write, traj: &Trajectory) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for i in 0..traj.len() {
        writeln!(
            w,
            "{},{},{}",
            num(traj.times[i]),
            num(traj.supply_levels[i]),
            num(traj.repair_levels[i])
        )?;
    }
    Ok(())
}

pub fn write_optimum(w: &mut impl Write, res: &SolveResult) -> io::Result<()> {
    writeln!(w, "{OPTIMUM_HEADER}")?;
    match &res.best {
        Some(p) => writeln!(w, "{},optimal", point_fields(p)),
        None => writeln!(w, ",,,,,,,,infeasible"),
    }
}

fn point_fields(p: &EvaluatedPoint) -> String {
    let d = p.decision;
    format!(
        "{},{},{},{},{},{},{},{}",
        d.production_lot,
        d.repair_lot,
        d.repair_cycles,
        d.production_cycles,
        num(d.return_quality),
        num(p.cost),
        opt(p.ghg),
        opt(p.energy)
    )
}
