pub mod compare;
pub mod fig1;
pub mod fig2;
pub mod optimize;
